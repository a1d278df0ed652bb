#pragma once

#include "aqkm/errors.hpp"
#include "aqkm/eval.hpp"
#include "aqkm/experiment.hpp"
#include "aqkm/io.hpp"
#include "aqkm/kmeans.hpp"
#include "aqkm/oracle.hpp"
#include "aqkm/preprocess.hpp"
#include "aqkm/random.hpp"
#include "aqkm/seeding.hpp"
#include "aqkm/serialize.hpp"
#include "aqkm/vecspace.hpp"
