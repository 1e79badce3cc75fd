#pragma once

#include "kreinlab/abstract1d.hpp"
#include "kreinlab/backend.hpp"
#include "kreinlab/error.hpp"
#include "kreinlab/extensions.hpp"
#include "kreinlab/geometry.hpp"
#include "kreinlab/kreinformulas.hpp"
#include "kreinlab/layerpot.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/oracles/disk.hpp"
#include "kreinlab/oracles/interval.hpp"
#include "kreinlab/oracles/wedge.hpp"
#include "kreinlab/parallel.hpp"
#include "kreinlab/specfun.hpp"
#include "kreinlab/spectral.hpp"
#include "kreinlab/traces.hpp"
#include "kreinlab/verify.hpp"
#include "kreinlab/weyl.hpp"
