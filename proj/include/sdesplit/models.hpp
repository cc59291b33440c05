#pragma once

#include <string>
#include <vector>

#include "sdesplit/model.hpp"

namespace sdesplit {

// Registry of built-in models. Identifiers and parameter orderings are part
// of the CLI/config contract:
//   ou             theta, mu
//   cir            theta, mu, b
//   student        theta, mu, a
//   igbm           theta, mu, a
//   f              theta, mu, a
//   wright_fisher  theta, mu, a        (a < 0)
//   ahn_gao        kappa, theta, sigma
//   ginzburg_landau  eta, lambda, sigma
//   verhulst         eta, lambda, sigma
const ModelSpec& get_model(const std::string& id);
std::vector<std::string> list_models();

// log of the modified Bessel function I_nu(z), z >= 0 (CIR density).
double log_bessel_i(double nu, double z);

}  // namespace sdesplit
