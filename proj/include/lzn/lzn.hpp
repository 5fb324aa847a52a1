#pragma once

// Umbrella header.

#include "lzn/analytics.hpp"
#include "lzn/capture.hpp"
#include "lzn/chirp.hpp"
#include "lzn/coarse_sync.hpp"
#include "lzn/codec.hpp"
#include "lzn/detector.hpp"
#include "lzn/fine_sync.hpp"
#include "lzn/io.hpp"
#include "lzn/metrics.hpp"
#include "lzn/modem.hpp"
#include "lzn/params.hpp"
#include "lzn/peaks.hpp"
#include "lzn/simulator.hpp"
#include "lzn/spectral.hpp"
#include "lzn/sweeps.hpp"
#include "lzn/templates.hpp"
