#pragma once

#include "amqsec/amq.hpp"
#include "amqsec/analysis.hpp"
#include "amqsec/attacks.hpp"
#include "amqsec/bloom.hpp"
#include "amqsec/coins.hpp"
#include "amqsec/cuckoo.hpp"
#include "amqsec/curve_io.hpp"
#include "amqsec/domain.hpp"
#include "amqsec/experiments.hpp"
#include "amqsec/games.hpp"
#include "amqsec/parallel.hpp"
#include "amqsec/prf.hpp"
