#pragma once

#include "arith.hpp"
#include "number_field.hpp"
#include "residue.hpp"
#include "characters.hpp"
#include "zeta.hpp"
#include "adelic.hpp"
#include "kms.hpp"
#include "klattice.hpp"
