#pragma once

#include "aspects.hpp"
#include "corpus.hpp"
#include "date.hpp"
#include "diversify.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "gmm.hpp"
#include "index.hpp"
#include "index_io.hpp"
#include "parallel.hpp"
#include "prune.hpp"
#include "relevance.hpp"
#include "search.hpp"
#include "synthetic.hpp"
#include "time_series.hpp"
#include "time_window.hpp"
#include "tokenize.hpp"

namespace tprune {

inline constexpr const char* version = "1.0.0";

}  // namespace tprune
