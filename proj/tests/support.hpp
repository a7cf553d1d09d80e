#pragma once

#include "sddhopf/equilibrium.hpp"

inline sddhopf::EquilibriumOptions positive_opts(bool positive) {
    sddhopf::EquilibriumOptions o;
    o.positive_orthant = positive;
    return o;
}
