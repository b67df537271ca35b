#pragma once

// Umbrella header for the block-based sparse table family.

#include "bbst.hpp"
#include "bbst2.hpp"
#include "compact.hpp"
#include "core.hpp"
#include "hybrid.hpp"
#include "io.hpp"
#include "offline.hpp"
#include "second_level.hpp"
#include "space.hpp"
#include "sparse_table.hpp"
#include "variant.hpp"
