#pragma once

#include "qerc/config.hpp"
#include "qerc/dataset.hpp"
#include "qerc/errors.hpp"
#include "qerc/experiments.hpp"
#include "qerc/io.hpp"
#include "qerc/linalg.hpp"
#include "qerc/netweights.hpp"
#include "qerc/pipeline.hpp"
#include "qerc/reservoir.hpp"
#include "qerc/rng.hpp"
