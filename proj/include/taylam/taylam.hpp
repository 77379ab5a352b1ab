#pragma once

// Umbrella header for the taylam library: ordinary lambda-terms and their
// reduction strategies, the rigid and multiset resource calculi, bounded
// expansion enumeration, normalization analyses, and the law harness.

#include "taylam/analysis.hpp"
#include "taylam/expansion.hpp"
#include "taylam/generators.hpp"
#include "taylam/laws.hpp"
#include "taylam/names.hpp"
#include "taylam/resource.hpp"
#include "taylam/rigid.hpp"
#include "taylam/syntax.hpp"
#include "taylam/term.hpp"
