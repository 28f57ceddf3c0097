#pragma once

#include "netrank/cli.hpp"
#include "netrank/config.hpp"
#include "netrank/dense.hpp"
#include "netrank/embedding.hpp"
#include "netrank/error.hpp"
#include "netrank/grad_check.hpp"
#include "netrank/graph.hpp"
#include "netrank/imgagn.hpp"
#include "netrank/layers.hpp"
#include "netrank/line.hpp"
#include "netrank/node2vec.hpp"
#include "netrank/optim.hpp"
#include "netrank/pipeline.hpp"
#include "netrank/rng.hpp"
#include "netrank/sage.hpp"
#include "netrank/stats.hpp"
#include "netrank/synth.hpp"
#include "netrank/trees.hpp"
