#pragma once

// Umbrella header for the safer-than decision library.

#include "safer/applications.hpp"
#include "safer/core.hpp"
#include "safer/crossing.hpp"
#include "safer/geometry.hpp"
#include "safer/io.hpp"
#include "safer/oracle.hpp"
#include "safer/relation.hpp"
#include "safer/rng.hpp"
#include "safer/transform.hpp"
