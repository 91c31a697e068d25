#pragma once

#include "zrp/asymptotics.hpp"
#include "zrp/common.hpp"
#include "zrp/config.hpp"
#include "zrp/dynamics.hpp"
#include "zrp/marginal.hpp"
#include "zrp/model.hpp"
#include "zrp/oracle.hpp"
#include "zrp/rng.hpp"
#include "zrp/runner.hpp"
#include "zrp/sampler.hpp"
#include "zrp/stats.hpp"
#include "zrp/tilted.hpp"
