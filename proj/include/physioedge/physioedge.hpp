#pragma once

#include "physioedge/budget.hpp"
#include "physioedge/dct.hpp"
#include "physioedge/embedding.hpp"
#include "physioedge/error.hpp"
#include "physioedge/metrics.hpp"
#include "physioedge/prmd.hpp"
#include "physioedge/prng.hpp"
#include "physioedge/record_io.hpp"
#include "physioedge/signal.hpp"
#include "physioedge/sparse_recon.hpp"
#include "physioedge/sync_sim.hpp"
#include "physioedge/wav.hpp"
