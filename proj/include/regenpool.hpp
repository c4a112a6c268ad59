#pragma once

#include "regenpool/cli.hpp"
#include "regenpool/config.hpp"
#include "regenpool/errors.hpp"
#include "regenpool/ksp.hpp"
#include "regenpool/milp/branch_and_bound.hpp"
#include "regenpool/milp/model.hpp"
#include "regenpool/milp/mps.hpp"
#include "regenpool/pipeline.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/report_io.hpp"
#include "regenpool/rrp.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"
#include "regenpool/warp.hpp"
