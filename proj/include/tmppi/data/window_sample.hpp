#pragma once

#include <Eigen/Core>

namespace tmppi::data {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One supervised pair: (k past states, context) -> H future controls.
struct WindowSample {
  RowMatrix past_states;      // k x n, oldest first
  Eigen::VectorXd context;    // p
  RowMatrix future_controls;  // H x m
  int episode = 0;            // index of the source episode
  int t = 0;                  // time step of the last past state
};

}  // namespace tmppi::data
