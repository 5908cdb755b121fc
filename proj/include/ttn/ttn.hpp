// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ttn/errors.hpp"
#include "ttn/io.hpp"
#include "ttn/network.hpp"
#include "ttn/reduction.hpp"
#include "ttn/sampling.hpp"
#include "ttn/tensor.hpp"
#include "ttn/topology.hpp"
