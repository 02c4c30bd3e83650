#pragma once

#include "gencd/coloring.hpp"
#include "gencd/engine.hpp"
#include "gencd/libsvm.hpp"
#include "gencd/loss.hpp"
#include "gencd/proposals.hpp"
#include "gencd/sparse_data.hpp"
#include "gencd/spectral.hpp"
#include "gencd/strategies.hpp"
#include "gencd/trace_io.hpp"
