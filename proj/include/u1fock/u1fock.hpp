#ifndef U1FOCK_U1FOCK_HPP
#define U1FOCK_U1FOCK_HPP

#include "u1fock/scalar.hpp"
#include "u1fock/partition.hpp"
#include "u1fock/fock.hpp"
#include "u1fock/heisenberg.hpp"
#include "u1fock/virasoro.hpp"
#include "u1fock/vertex.hpp"
#include "u1fock/twodim.hpp"
#include "u1fock/diagnostics.hpp"
#include "u1fock/desitter.hpp"
#include "u1fock/harness.hpp"

#endif  // U1FOCK_U1FOCK_HPP
