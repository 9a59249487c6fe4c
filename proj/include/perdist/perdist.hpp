#pragma once

#include "perdist/corona.hpp"
#include "perdist/counterexamples.hpp"
#include "perdist/elem_factor.hpp"
#include "perdist/errors.hpp"
#include "perdist/ideal_theory.hpp"
#include "perdist/parallel.hpp"
#include "perdist/ring_core.hpp"
#include "perdist/uniform_factor.hpp"
