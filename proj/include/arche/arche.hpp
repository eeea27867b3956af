#pragma once

// Umbrella header.

#include "arche/cache.hpp"
#include "arche/cli.hpp"
#include "arche/config.hpp"
#include "arche/coordinate.hpp"
#include "arche/corpus.hpp"
#include "arche/dot.hpp"
#include "arche/edge_type.hpp"
#include "arche/errors.hpp"
#include "arche/http.hpp"
#include "arche/judge.hpp"
#include "arche/metrics.hpp"
#include "arche/pipeline.hpp"
#include "arche/prompts.hpp"
#include "arche/rlt.hpp"
#include "arche/validate.hpp"
