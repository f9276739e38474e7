#pragma once

#include "hx3d/linac/attachments.hpp"
#include "hx3d/linac/config.hpp"
#include "hx3d/linac/geometry.hpp"
#include "hx3d/linac/sweep.hpp"
