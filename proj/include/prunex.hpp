#pragma once

#include "prunex/classify.hpp"
#include "prunex/errors.hpp"
#include "prunex/gen.hpp"
#include "prunex/heuristics.hpp"
#include "prunex/ingest.hpp"
#include "prunex/model.hpp"
#include "prunex/oracle.hpp"
#include "prunex/pareto.hpp"
#include "prunex/raise.hpp"
#include "prunex/rational.hpp"
#include "prunex/replace.hpp"
