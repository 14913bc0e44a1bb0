#pragma once

#include "wropuf/bch.hpp"
#include "wropuf/chip_sim.hpp"
#include "wropuf/cost_model.hpp"
#include "wropuf/error.hpp"
#include "wropuf/io.hpp"
#include "wropuf/metrics.hpp"
#include "wropuf/report.hpp"
#include "wropuf/response_word.hpp"
#include "wropuf/ro_model.hpp"
#include "wropuf/rng.hpp"
#include "wropuf/sampler.hpp"
