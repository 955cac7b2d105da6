#pragma once

#include "divalg/rational.hpp"
#include "divalg/poly.hpp"
#include "divalg/algebra.hpp"
#include "divalg/orders.hpp"
#include "divalg/geometry.hpp"
#include "divalg/counting.hpp"
#include "divalg/bounds.hpp"
#include "divalg/config.hpp"
#include "divalg/verify.hpp"
