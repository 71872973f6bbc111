#pragma once

#include "subtv/assembly.hpp"
#include "subtv/fields.hpp"
#include "subtv/mesh.hpp"

namespace subtv {

/// Discrete total variation of a P1 field: sum_K |K| |grad f|_K|_2.
double tv_value(const Mesh& mesh, const NodalField& f);

/// Element-wise projection onto the dual unit ball: rho_K / max(1, |rho_K|_2).
ElementVectorField project_ball(const ElementVectorField& rho);

/// True when every element vector has Euclidean norm at most 1 (+ slack).
bool in_dual_ball(const ElementVectorField& rho, double slack = 1e-14);

/// Dual pairing sum_K |K| (grad f)_K . rho_K. For feasible rho it never
/// exceeds tv_value(f); the canonical maximizer attains it.
double dual_pairing(const Mesh& mesh, const NodalField& f, const ElementVectorField& rho);

/// The maximizer grad f / |grad f| of the dual pairing, with 0 on elements
/// where the gradient vanishes.
ElementVectorField canonical_dual(const Mesh& mesh, const NodalField& f);

}  // namespace subtv
