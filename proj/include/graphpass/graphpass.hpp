#pragma once

#include "graphpass/audit.hpp"
#include "graphpass/calculus.hpp"
#include "graphpass/cli.hpp"
#include "graphpass/energy.hpp"
#include "graphpass/errors.hpp"
#include "graphpass/graph.hpp"
#include "graphpass/io.hpp"
#include "graphpass/model.hpp"
#include "graphpass/solver.hpp"
