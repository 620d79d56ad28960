#pragma once

#include "mixiso/chain.hpp"
#include "mixiso/enumerate.hpp"
#include "mixiso/error.hpp"
#include "mixiso/gaussian.hpp"
#include "mixiso/gradients.hpp"
#include "mixiso/io.hpp"
#include "mixiso/isoperimetry.hpp"
#include "mixiso/piecewise.hpp"
#include "mixiso/profile.hpp"
#include "mixiso/spectral.hpp"
#include "mixiso/verify.hpp"
#include "mixiso/zoo.hpp"
