#pragma once

#include "prunex/raise/box_dp.hpp"
#include "prunex/raise/fpt_k.hpp"
#include "prunex/raise/grid.hpp"
#include "prunex/raise/ops.hpp"
#include "prunex/raise/prunable.hpp"
#include "prunex/raise/subsets.hpp"
#include "prunex/raise/zero_peel.hpp"
