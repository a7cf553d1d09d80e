#pragma once

#include "sddhopf/error.hpp"
#include "sddhopf/model.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/stability.hpp"
#include "sddhopf/normal_form.hpp"
#include "sddhopf/history.hpp"
#include "sddhopf/dopri5.hpp"
#include "sddhopf/simulate.hpp"
#include "sddhopf/oscillation.hpp"
#include "sddhopf/config.hpp"
#include "sddhopf/sweep.hpp"
