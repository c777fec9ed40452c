#pragma once

#include "sbump/numeric.hpp"
#include "sbump/dyadic.hpp"
#include "sbump/bump_functions.hpp"
#include "sbump/young.hpp"
#include "sbump/constants.hpp"
#include "sbump/testing.hpp"
#include "sbump/instance.hpp"
#include "sbump/search.hpp"
#include "sbump/io.hpp"
