#pragma once

#include "qcp/applications.hpp"
#include "qcp/core.hpp"
#include "qcp/geometry.hpp"
#include "qcp/lp.hpp"
#include "qcp/mesh.hpp"
#include "qcp/recurrence.hpp"
#include "qcp/smooth.hpp"
#include "qcp/vec.hpp"
