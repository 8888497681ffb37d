#pragma once

#include "slitmap/error.hpp"
#include "slitmap/spectral.hpp"
#include "slitmap/geometry.hpp"
#include "slitmap/mobius.hpp"
#include "slitmap/dirichlet.hpp"
#include "slitmap/koebe.hpp"
#include "slitmap/circular_aut.hpp"
#include "slitmap/families.hpp"
#include "slitmap/io.hpp"
