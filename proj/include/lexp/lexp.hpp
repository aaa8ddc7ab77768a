#pragma once

#include "lexp/term.hpp"
#include "lexp/reduction.hpp"
#include "lexp/types.hpp"
#include "lexp/context.hpp"
#include "lexp/syntax.hpp"
#include "lexp/substructural.hpp"
#include "lexp/intersection.hpp"
#include "lexp/expansion.hpp"
#include "lexp/verify.hpp"
#include "lexp/serialize.hpp"
