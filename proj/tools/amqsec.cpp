#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "amqsec/amqsec.hpp"

using namespace amqsec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitThreshold = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void kv(const std::string& k, const std::string& v) { std::cout << k << ": " << v << '\n'; }
void kv(const std::string& k, double v) { kv(k, g17(v)); }
void kv(const std::string& k, std::uint64_t v) { kv(k, std::to_string(v)); }

std::filesystem::path output_dir() {
  const char* env = std::getenv("AMQSEC_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::current_path();
}

/// Filter parameters shared by several subcommands.
struct FilterOpts {
  std::string family = "bloom";
  std::uint64_t m = 1024;
  unsigned k = 7;
  std::uint32_t s = 4;
  unsigned lambda_i = 12;
  unsigned lambda_t = 8;
  unsigned num = kDefaultCuckooNum;

  void add(CLI::App* app, const std::string& default_family) {
    family = default_family;
    app->add_option("--family", family, "bloom | cuckoo | prf_wrapped_cuckoo")->capture_default_str();
    app->add_option("--m", m, "Bloom bit length")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--k", k, "Bloom indices per element")->capture_default_str()->check(CLI::Range(1, 64));
    app->add_option("--s", s, "Cuckoo slots per bucket")->capture_default_str()->check(CLI::Range(1, 65535));
    app->add_option("--lambda-i", lambda_i, "Cuckoo bucket index bits")->capture_default_str()->check(CLI::Range(1, 32));
    app->add_option("--lambda-t", lambda_t, "Cuckoo tag bits")->capture_default_str()->check(CLI::Range(1, 32));
    app->add_option("--num", num, "Cuckoo relocation limit")->capture_default_str()->check(CLI::PositiveNumber);
  }

  AmqDescriptor descriptor() const {
    switch (parse_family(family)) {
      case Family::bloom: return AmqDescriptor::bloom({m, k});
      case Family::cuckoo: return AmqDescriptor::cuckoo({s, lambda_i, lambda_t, num});
      case Family::prf_wrapped_cuckoo: return AmqDescriptor::prf_wrapped_cuckoo({s, lambda_i, lambda_t, num});
    }
    throw UsageError("unknown family");
  }

  void print(const AmqDescriptor& d) const {
    kv("family", to_string(d.family));
    if (d.family == Family::bloom) {
      kv("m", d.bloom_params().m);
      kv("k", std::uint64_t{d.bloom_params().k});
    } else {
      const auto& pp = d.cuckoo_params();
      kv("s", std::uint64_t{pp.s});
      kv("lambda_i", std::uint64_t{pp.lambda_i});
      kv("lambda_t", std::uint64_t{pp.lambda_t});
      kv("num", std::uint64_t{pp.num});
    }
  }
};

double eps_from_log2(double l) {
  if (l > 0) throw UsageError("--eps-prf-log2 must be <= 0");
  return std::exp2(l);
}

/// Random up/qry mix used by the game subcommands.
AdversaryStrategy mixed_adversary(QueryBudget b, std::size_t element_len) {
  AdversaryStrategy adv;
  adv.budget = b;
  adv.run = [b, element_len](GameOracles& o, CoinSource& c) {
    std::vector<DomainElement> v;
    for (std::uint64_t i = 0; i < b.n; ++i) v.push_back(random_element(c, kFreshElementBytes));
    o.rep(v);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < std::max(b.q_u, b.q_t); ++i) {
      if (i < b.q_u) o.up(random_element(c, element_len));
      if (i < b.q_t) hits += o.qry(random_element(c, element_len));
    }
    Bytes out = guess_bytes(hits & 1);
    if (b.q_v) {
      auto s = o.reveal();
      if (s) out = guess_bytes(std::hash<std::string>{}(to_hex(*s)) & 1);
    }
    return out;
  };
  return adv;
}

void print_advantage(const AdvantageEstimate& e) {
  kv("advantage", e.advantage);
  kv("half_width_95", e.half_width);
  kv("p0", e.p0);
  kv("p1", e.p1);
  kv("trials_per_world", std::uint64_t{e.per_world});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial correctness and privacy toolkit for Bloom and Cuckoo filters"};
  app.set_version_flag("--version", std::string("amqsec ") + kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for every randomized run")->capture_default_str();

  int rc = kExitOk;

  // fp-bound
  auto* fp = app.add_subcommand("fp-bound", "NAI false-positive probability");
  FilterOpts fp_f;
  fp_f.add(fp, "bloom");
  std::uint64_t fp_n = 0;
  unsigned range_bits = 256;
  fp->add_option("--n", fp_n, "Inserted elements (Bloom)")->capture_default_str();
  fp->add_option("--range-bits", range_bits, "PRF output bits (PRF-wrapped Cuckoo)")->capture_default_str();
  fp->callback([&] {
    auto d = fp_f.descriptor();
    fp_f.print(d);
    if (d.family == Family::bloom) {
      if (d.bloom_params().m < 2) throw UsageError("--m must be >= 2");
      auto b = bloom_nai_fp_bound(fp_f.m, fp_f.k, fp_n);
      kv("n", fp_n);
      kv("bound", b.bound);
      kv("estimate", b.estimate);
    } else if (d.family == Family::cuckoo) {
      kv("bound", cuckoo_nai_fp_bound(fp_f.s, fp_f.lambda_t));
    } else {
      kv("range_bits", std::uint64_t{range_bits});
      kv("bound", cuckoo_nai_fp_bound(fp_f.s, fp_f.lambda_t, range_bits));
    }
    kv("storage_bits", storage_bits(d));
  });

  // adv-bound
  auto* adv = app.add_subcommand("adv-bound", "Adversarial correctness bound eps'");
  FilterOpts adv_f;
  adv_f.add(adv, "bloom");
  QueryBudget budget;
  double eps_log2 = -256;
  std::optional<double> nai_override;
  bool immutable = false;
  adv->add_option("--n", budget.n, "Rep insertions")->capture_default_str();
  adv->add_option("--q-u", budget.q_u, "Up queries")->capture_default_str();
  adv->add_option("--q-t", budget.q_t, "Qry queries")->capture_default_str();
  adv->add_option("--q-v", budget.q_v, "Reveal queries")->capture_default_str();
  adv->add_option("--eps-prf-log2", eps_log2, "log2 of the PRF advantage")->capture_default_str();
  adv->add_option("--nai-fp", nai_override, "Use this NAI FP instead of the family formula")->check(CLI::Range(0.0, 1.0));
  adv->add_flag("--immutable", immutable, "No Up queries allowed");
  adv->callback([&] {
    const double eps = eps_from_log2(eps_log2);
    BoundReport r;
    if (nai_override) {
      r = adversarial_correctness_bound(eps, budget, *nai_override, immutable);
    } else {
      auto d = adv_f.descriptor();
      adv_f.print(d);
      r = bound_report(d, budget, eps, immutable);
      kv("storage_bits", *r.storage_bits);
      kv("alpha_beta_one", std::string(*r.alpha_beta_one ? "true" : "false"));
    }
    kv("n", budget.n);
    kv("q_u", budget.q_u);
    kv("q_t", budget.q_t);
    kv("q_v", budget.q_v);
    kv("immutable", std::string(immutable ? "true" : "false"));
    kv("eps_prf", r.eps_prf);
    kv("nai_fp", r.nai_fp);
    kv("eps_prime", r.adversarial_bound);
  });

  // privacy-bound
  auto* priv = app.add_subcommand("privacy-bound", "Elem-Rep / Rep privacy closed form");
  std::uint64_t pq_u = 0, pq_t = 0;
  double min_entropy = 128, priv_eps_log2 = -256;
  priv->add_option("--q-u", pq_u)->capture_default_str();
  priv->add_option("--q-t", pq_t)->capture_default_str();
  priv->add_option("--min-entropy", min_entropy, "Min-entropy of each element of V (bits)")->capture_default_str();
  priv->add_option("--eps-prf-log2", priv_eps_log2)->capture_default_str();
  priv->callback([&] {
    auto r = privacy_guessing_bound(pq_u, pq_t, min_entropy, eps_from_log2(priv_eps_log2));
    kv("eps_prf", r.eps_prf);
    kv("min_entropy", r.min_entropy);
    kv("guess_bound", r.guess_bound);
    kv("rep_privacy_bound", r.rep_privacy_bound);
    kv("elem_rep_privacy_bound", r.eps_prf);
  });

  // plan
  auto* plan = app.add_subcommand("plan", "Storage vs worst-case eps' sweep");
  std::string plan_family = "bloom", plan_format, plan_out;
  double log_n = 7, log_q = 30, plan_eps_log2 = -256;
  std::optional<double> target_log2;
  plan->add_option("--family", plan_family, "bloom | cuckoo")->capture_default_str();
  plan->add_option("--log-n", log_n)->capture_default_str()->check(CLI::Range(0.0, 62.0));
  plan->add_option("--log-q", log_q)->capture_default_str()->check(CLI::Range(0.0, 62.0));
  plan->add_option("--eps-prf-log2", plan_eps_log2)->capture_default_str();
  plan->add_option("--target-log2", target_log2, "Report matched storage at this log2 FP target");
  plan->add_option("--out", plan_out, "Output path (default: plan_<family>.<format> in $AMQSEC_OUT_DIR)");
  plan->add_option("--format", plan_format, "csv | svg | json (default from --out extension, else csv)");
  plan->callback([&] {
    Family fam = parse_family(plan_family);
    if (fam == Family::prf_wrapped_cuckoo) fam = Family::cuckoo;
    eps_from_log2(plan_eps_log2);
    if (plan_format.empty()) {
      auto ext = std::filesystem::path(plan_out).extension().string();
      plan_format = ext.size() > 1 ? ext.substr(1) : "csv";
    }
    CurveFormat fmt = parse_curve_format(plan_format);
    const auto n = static_cast<std::uint64_t>(std::llround(std::exp2(log_n)));
    const auto q = static_cast<std::uint64_t>(std::llround(std::exp2(log_q)));
    SweepConfig cfg{fam, n, q, plan_eps_log2, default_grid(fam, n, q)};
    auto res = parameter_sweep(cfg);
    if (plan_out.empty()) plan_out = (output_dir() / ("plan_" + to_string(fam) + "." + plan_format)).string();
    CurveManifest man{fam, n, q, plan_eps_log2, target_log2, seed, "default"};
    emit_curve(res.points, fmt, plan_out, man);
    kv("family", to_string(fam));
    kv("n", n);
    kv("q", q);
    kv("points", std::uint64_t{res.points.size()});
    kv("dropped_infeasible", std::uint64_t{res.dropped_infeasible});
    kv("out", plan_out);
    if (target_log2) {
      auto ms = matched_storage(res.points, *target_log2);
      if (!ms) {
        kv("matched", std::string("none"));
      } else {
        kv("adversarial_storage_bits", ms->adversarial.storage_bits);
        kv("honest_storage_bits", ms->honest.storage_bits);
        kv("storage_ratio", ms->ratio);
      }
    }
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiments");
  exp->require_subcommand(1);
  bool check = false;
  exp->add_flag("--check", check, "Exit 3 when the experiment misses its threshold");

  auto* lf = exp->add_subcommand("load-factor", "Fill fraction at the first failed insertion");
  FilterOpts lf_f;
  lf_f.lambda_i = 15;
  std::size_t lf_trials = 16;
  double lf_threshold = kCuckooFeasibleLoad;
  lf_f.add(lf, "prf_wrapped_cuckoo");
  lf->add_option("--trials", lf_trials)->capture_default_str()->check(CLI::PositiveNumber);
  lf->add_option("--threshold", lf_threshold)->capture_default_str();
  lf->callback([&] {
    auto d = lf_f.descriptor();
    if (d.family == Family::bloom) throw UsageError("load-factor needs a Cuckoo family");
    kv("seed", seed);
    lf_f.print(d);
    auto r = load_factor_experiment(d, lf_trials, seed);
    for (std::size_t i = 0; i < r.fractions.size(); ++i) kv("trial_" + std::to_string(i), r.fractions[i]);
    kv("mean", r.mean);
    kv("min", r.min);
    if (check && r.mean < lf_threshold) rc = kExitThreshold;
  });

  auto* efp = exp->add_subcommand("fp", "Honest false-positive rate against the bound");
  FilterOpts efp_f;
  std::uint64_t efp_n = 100, probes = 100000;
  efp_f.add(efp, "bloom");
  efp->add_option("--n", efp_n)->capture_default_str();
  efp->add_option("--probes", probes)->capture_default_str()->check(CLI::PositiveNumber);
  std::optional<double> fill_load;
  efp->add_option("--load", fill_load, "Cuckoo: insert until this slot fraction is occupied (ignores --n)")
      ->check(CLI::Range(0.0, 1.0));
  efp->callback([&] {
    auto d = efp_f.descriptor();
    kv("seed", seed);
    efp_f.print(d);
    if (fill_load && d.family == Family::bloom) throw UsageError("--load needs a Cuckoo family");
    auto r = fill_load ? honest_fp_at_load(d, *fill_load, probes, seed) : honest_fp_experiment(d, efp_n, probes, seed);
    kv("n", r.inserted);
    kv("probes", r.probes);
    kv("positives", r.positives);
    kv("fp", r.fp);
    kv("sigma", r.sigma);
    kv("bound", r.bound);
    if (d.family == Family::bloom) kv("estimate", r.estimate);
    kv("load", r.load);
    const double slack = 3 * std::sqrt(r.bound * (1 - r.bound) / static_cast<double>(std::max<std::uint64_t>(r.probes, 1)));
    kv("threshold", r.bound + slack);
    if (check && r.fp > r.bound + slack) rc = kExitThreshold;
  });

  auto* nai = exp->add_subcommand("nai-check", "Real vs ideal Reveal-state distance with q_t = 0");
  FilterOpts nai_f;
  nai_f.m = 8;
  nai_f.k = 1;
  std::uint64_t nai_n = 3;
  std::size_t nai_trials = 100000;
  double nai_threshold = 0.02;
  nai_f.add(nai, "bloom");
  nai->add_option("--n", nai_n)->capture_default_str();
  nai->add_option("--trials", nai_trials)->capture_default_str()->check(CLI::PositiveNumber);
  nai->add_option("--threshold", nai_threshold)->capture_default_str();
  nai->callback([&] {
    auto d = nai_f.descriptor();
    kv("seed", seed);
    nai_f.print(d);
    auto r = nai_check(d, nai_n, nai_trials, seed);
    kv("trials", std::uint64_t{r.trials});
    kv("support_real", std::uint64_t{r.real.size()});
    kv("support_ideal", std::uint64_t{r.ideal.size()});
    kv("statistical_distance", r.distance);
    if (check && r.distance > nai_threshold) rc = kExitThreshold;
  });

  // attack
  auto* atk = app.add_subcommand("attack", "Attacks on weak and keyed instances");
  atk->require_subcommand(1);
  std::string target = "weak";
  auto parse_target = [&] {
    if (target == "weak" || target == "weak_public") return HashTarget::weak_public;
    if (target == "keyed") return HashTarget::keyed;
    throw UsageError("--target must be weak or keyed");
  };

  auto* pol = atk->add_subcommand("pollution", "Greedy pollution of a Bloom filter");
  PollutionConfig pcfg;
  pol->add_option("--target", target, "weak | keyed")->capture_default_str();
  pol->add_option("--m", pcfg.m)->capture_default_str()->check(CLI::PositiveNumber);
  pol->add_option("--k", pcfg.k)->capture_default_str()->check(CLI::Range(1, 64));
  pol->add_option("--n", pcfg.n)->capture_default_str();
  pol->add_option("--q-u", pcfg.q_u)->capture_default_str();
  pol->add_option("--probes", pcfg.probes)->capture_default_str();
  pol->add_option("--uniform-probes", pcfg.uniform_probes)->capture_default_str();
  pol->add_option("--candidates", pcfg.candidates_per_up)->capture_default_str()->check(CLI::PositiveNumber);
  pol->callback([&] {
    pcfg.seed = seed;
    auto r = attack_pollution_bloom(parse_target(), pcfg);
    kv("seed", seed);
    kv("target", target);
    kv("ups_used", r.ups_used);
    kv("probes", r.probes);
    kv("adversarial_fp", r.adversarial_fp);
    kv("adversarial_sigma", r.adversarial_sigma);
    kv("uniform_fp", r.uniform_fp);
    kv("honest_bound", r.honest_bound);
    kv("envelope", r.envelope);
  });

  auto* tsc = atk->add_subcommand("tsc", "Target-set coverage");
  TscConfig tcfg;
  std::size_t tsc_size = 4, tsc_trials = 100;
  tsc->add_option("--target", target, "weak | keyed")->capture_default_str();
  tsc->add_option("--m", tcfg.m)->capture_default_str()->check(CLI::PositiveNumber);
  tsc->add_option("--k", tcfg.k)->capture_default_str()->check(CLI::Range(1, 64));
  tsc->add_option("--n", tcfg.n)->capture_default_str();
  tsc->add_option("--q-u", tcfg.q_u)->capture_default_str();
  tsc->add_option("--size", tsc_size, "|L|")->capture_default_str();
  tsc->add_option("--trials", tsc_trials)->capture_default_str()->check(CLI::PositiveNumber);
  tsc->callback([&] {
    auto t = parse_target();
    std::size_t wins = 0;
    for (std::size_t i = 0; i < tsc_trials; ++i) {
      tcfg.seed = derive_seed(seed, 2 * i);
      CoinSource c(derive_seed(seed, 2 * i + 1));
      std::vector<DomainElement> L;
      for (std::size_t j = 0; j < tsc_size; ++j) L.push_back(random_element(c));
      wins += attack_target_set_coverage(t, L, tcfg).success;
    }
    kv("seed", seed);
    kv("target", target);
    kv("trials", std::uint64_t{tsc_trials});
    kv("successes", std::uint64_t{wins});
    kv("success_rate", static_cast<double>(wins) / static_cast<double>(tsc_trials));
    kv("envelope", tsc_envelope(bloom_nai_fp_bound(tcfg.m, tcfg.k, tcfg.n + tcfg.q_u).bound, tsc_size,
                                std::ldexp(1.0, -256)));
  });

  auto* cpi = atk->add_subcommand("cuckoo-pi", "Permutation-invariance distinguisher");
  FilterOpts cpi_f;
  cpi_f.s = 1;
  cpi_f.lambda_i = 8;
  CuckooPiConfig ccfg;
  std::size_t cpi_trials = 100;
  cpi_f.add(cpi, "cuckoo");
  cpi->add_option("--q-u", ccfg.q_u)->capture_default_str();
  cpi->add_option("--q-v", ccfg.q_v)->capture_default_str();
  cpi->add_option("--tests", ccfg.tests)->capture_default_str()->check(CLI::PositiveNumber);
  cpi->add_option("--trials", cpi_trials)->capture_default_str()->check(CLI::Range(100u, 100000000u));
  cpi->callback([&] {
    auto d = cpi_f.descriptor();
    if (d.family == Family::bloom) throw UsageError("cuckoo-pi needs a Cuckoo family");
    kv("seed", seed);
    cpi_f.print(d);
    print_advantage(estimate_pi_advantage(make_cuckoo_pi_adversary(ccfg), d, cpi_trials, seed));
  });

  // game
  auto* game = app.add_subcommand("game", "Run the security games");
  game->require_subcommand(1);

  auto* roi = game->add_subcommand("roi", "One real-or-ideal correctness game with a random adversary");
  FilterOpts roi_f;
  roi_f.m = 256;
  roi_f.k = 3;
  QueryBudget roi_b{8, 16, 16, 1};
  std::string world = "real", transcript;
  roi_f.add(roi, "bloom");
  roi->add_option("--world", world, "real | ideal")->capture_default_str();
  roi->add_option("--n", roi_b.n)->capture_default_str();
  roi->add_option("--q-u", roi_b.q_u)->capture_default_str();
  roi->add_option("--q-t", roi_b.q_t)->capture_default_str();
  roi->add_option("--q-v", roi_b.q_v)->capture_default_str();
  roi->add_option("--transcript", transcript, "JSON-lines transcript path (default: stdout)");
  roi->callback([&] {
    if (world != "real" && world != "ideal") throw UsageError("--world must be real or ideal");
    auto d = roi_f.descriptor();
    auto out = run_real_or_ideal(mixed_adversary(roi_b, 2), d, world == "real" ? World::real : World::ideal, seed);
    kv("seed", seed);
    roi_f.print(d);
    kv("world", world);
    kv("output", to_hex(out.output));
    if (transcript.empty()) {
      write_transcript_jsonl(std::cout, out.transcript);
    } else {
      std::ofstream f(transcript);
      if (!f) throw IoError("cannot open " + transcript + " for writing");
      write_transcript_jsonl(f, out.transcript);
      if (!f) throw IoError("failed writing " + transcript);
      kv("transcript", transcript);
    }
  });

  auto* pi = game->add_subcommand("pi", "PI-game advantage of a random adversary");
  FilterOpts pi_f;
  QueryBudget pi_b{8, 16, 16, 1};
  std::size_t pi_trials = 1000;
  pi_f.add(pi, "bloom");
  pi->add_option("--n", pi_b.n)->capture_default_str();
  pi->add_option("--q-u", pi_b.q_u)->capture_default_str();
  pi->add_option("--q-t", pi_b.q_t)->capture_default_str();
  pi->add_option("--q-v", pi_b.q_v)->capture_default_str();
  pi->add_option("--trials", pi_trials)->capture_default_str()->check(CLI::Range(100u, 100000000u));
  pi->callback([&] {
    auto d = pi_f.descriptor();
    kv("seed", seed);
    pi_f.print(d);
    print_advantage(estimate_pi_advantage(mixed_adversary(pi_b, 2), d, pi_trials, seed));
  });

  auto* er = game->add_subcommand("elem-rep", "Snapshot privacy: size-estimate distinguisher on Reveal");
  FilterOpts er_f;
  std::size_t er_v = 100, er_trials = 1000;
  std::string variant = "elem-rep";
  er_f.add(er, "bloom");
  er->add_option("--v-size", er_v, "|V|")->capture_default_str();
  er->add_option("--variant", variant, "elem-rep | rep")->capture_default_str();
  er->add_option("--trials", er_trials)->capture_default_str()->check(CLI::Range(100u, 100000000u));
  er->callback([&] {
    if (variant != "elem-rep" && variant != "rep") throw UsageError("--variant must be elem-rep or rep");
    auto d = er_f.descriptor();
    AdversaryStrategy a2;
    a2.budget = {0, 0, 0, 1};
    a2.run = [](GameOracles& o, CoinSource&) { return o.reveal().value_or(Bytes{}); };
    auto run = [&](int w, std::uint64_t s) {
      CoinSource c(derive_seed(s, 99));
      std::vector<DomainElement> v;
      for (std::size_t i = 0; i < er_v; ++i) v.push_back(random_element(c, kFreshElementBytes));
      auto r = run_elem_rep_privacy(a2, d, v, w ? World::ideal : World::real,
                                    variant == "rep" ? PrivacyVariant::rep : PrivacyVariant::elem_rep, s);
      auto st = deserialize_state(r.out);
      std::uint64_t occ = 0;
      if (auto* b = std::get_if<BloomState>(&st.state))
        occ = b->popcount();
      else
        occ = std::get<CuckooState>(st.state).occupied();
      return std::hash<std::uint64_t>{}(occ) & 1;
    };
    kv("seed", seed);
    er_f.print(d);
    print_advantage(estimate_advantage(run, er_trials, seed));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return rc;
}
