#pragma once

#include "hx3d/server/command.hpp"
#include "hx3d/server/engine.hpp"
#include "hx3d/server/http.hpp"
#include "hx3d/server/snapshot.hpp"
#include "hx3d/server/state.hpp"
