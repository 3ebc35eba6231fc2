#pragma once

#include "emfrisk/clustering.hpp"
#include "emfrisk/decimal.hpp"
#include "emfrisk/error.hpp"
#include "emfrisk/json_io.hpp"
#include "emfrisk/measurement.hpp"
#include "emfrisk/pipeline.hpp"
#include "emfrisk/ranges.hpp"
#include "emfrisk/risk_map.hpp"
