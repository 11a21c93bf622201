#pragma once

#include "leakywire/assumptions.hpp"
#include "leakywire/curve.hpp"
#include "leakywire/eigenfield.hpp"
#include "leakywire/error.hpp"
#include "leakywire/io.hpp"
#include "leakywire/operators.hpp"
#include "leakywire/oracle.hpp"
#include "leakywire/parallel.hpp"
#include "leakywire/solver.hpp"
#include "leakywire/spectral.hpp"
