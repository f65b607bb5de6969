#pragma once

#include "spclust/constrained.hpp"
#include "spclust/constraint.hpp"
#include "spclust/dataset.hpp"
#include "spclust/errors.hpp"
#include "spclust/kmeans.hpp"
#include "spclust/linkage.hpp"
#include "spclust/numfmt.hpp"
#include "spclust/oracle.hpp"
#include "spclust/rng.hpp"
#include "spclust/scheduling.hpp"
#include "spclust/spacing.hpp"
#include "spclust/threading.hpp"
