#pragma once

// Umbrella header.

#include "pcover/acceptance.hpp"
#include "pcover/bridge.hpp"
#include "pcover/epoly.hpp"
#include "pcover/error.hpp"
#include "pcover/family.hpp"
#include "pcover/fragment.hpp"
#include "pcover/generators.hpp"
#include "pcover/io.hpp"
#include "pcover/ledger.hpp"
#include "pcover/multiset.hpp"
#include "pcover/parallel.hpp"
#include "pcover/rational.hpp"
#include "pcover/rng.hpp"
#include "pcover/selector.hpp"
#include "pcover/set_cover.hpp"
#include "pcover/subset.hpp"
