#pragma once

#include "hx3d/haptics/contact.hpp"
#include "hx3d/haptics/device.hpp"
#include "hx3d/haptics/probe.hpp"
#include "hx3d/haptics/trajectory.hpp"
