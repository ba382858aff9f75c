#pragma once

#include "magsense/contour.hpp"
#include "magsense/dynamics.hpp"
#include "magsense/errors.hpp"
#include "magsense/model.hpp"
#include "magsense/monte_carlo.hpp"
#include "magsense/reconstruction.hpp"
#include "magsense/sensing.hpp"
#include "magsense/series.hpp"
#include "magsense/spectra.hpp"
#include "magsense/units.hpp"
