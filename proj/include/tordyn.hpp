#pragma once

#include "tordyn/poly_core.hpp"
#include "tordyn/classify.hpp"
#include "tordyn/embedding.hpp"
#include "tordyn/torus_dynamics.hpp"
#include "tordyn/harmonic.hpp"
#include "tordyn/measures.hpp"
#include "tordyn/density.hpp"
#include "tordyn/io.hpp"
