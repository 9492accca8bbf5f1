#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "instances.hpp"
