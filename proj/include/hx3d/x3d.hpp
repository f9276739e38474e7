#pragma once

#include "hx3d/x3d/parser.hpp"
#include "hx3d/x3d/schema.hpp"
#include "hx3d/x3d/serializer.hpp"
#include "hx3d/x3d/types.hpp"
#include "hx3d/x3d/validate.hpp"
