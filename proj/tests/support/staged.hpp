#pragma once

// RRP then WARP on one instance, keeping every intermediate for inspection.

#include "regenpool/milp/branch_and_bound.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/rrp.hpp"
#include "regenpool/warp.hpp"

namespace staged {

struct Run {
  regenpool::RrpInstance in;
  regenpool::RrpModel rm;
  regenpool::milp::Solution rs;
  regenpool::RrpSolution rrp;
  regenpool::WarpInstance wi;
  regenpool::WarpModel wm;
  regenpool::milp::Solution ws;
  regenpool::WarpSolution warp;
};

inline Run run(regenpool::RrpInstance in) {
  Run r;
  r.in = std::move(in);
  r.rm = regenpool::build_rrp(r.in);
  r.rs = regenpool::milp::solve_milp(r.rm.model);
  r.rrp = regenpool::extract_rrp(r.rs, r.in, r.rm);
  r.wi = regenpool::segment_accepted(r.in, r.rrp, regenpool::SurrogateQot{});
  r.wm = regenpool::build_warp(r.wi);
  r.ws = regenpool::milp::solve_milp(r.wm.model);
  r.warp = regenpool::extract_warp(r.ws, r.wi, r.wm);
  return r;
}

}  // namespace staged
