#pragma once

#include "tickbound/canonical_json.hpp"
#include "tickbound/composite_var.hpp"
#include "tickbound/error.hpp"
#include "tickbound/freq_moments.hpp"
#include "tickbound/gauss_limit.hpp"
#include "tickbound/ingest_io.hpp"
#include "tickbound/macro_agg.hpp"
#include "tickbound/market_price.hpp"
#include "tickbound/market_return.hpp"
#include "tickbound/report.hpp"
#include "tickbound/rng.hpp"
#include "tickbound/summation.hpp"
#include "tickbound/synth_gen.hpp"
#include "tickbound/trade_core.hpp"
#include "tickbound/version.hpp"
#include "tickbound/window_analyzer.hpp"
