// Built with the Lie product sign flipped. The property suites must notice.

#include "test_support.hpp"

using namespace beable;

TEST_CASE("flipped Lie sign is caught by the product suites", "[mutation]") {
  const TheoremReport rep = verify_theorems({2, 3}, 5, 42);
  CHECK_FALSE(rep.all_passed());

  auto suite = [&](const std::string& name) -> const SuiteResult& {
    for (const SuiteResult& s : rep.suites)
      if (s.name == name) return s;
    FAIL("no suite " << name);
    throw 0;
  };
  CHECK_FALSE(suite("pauli-identities").ok());
  CHECK_FALSE(suite("product-identities").ok());
  CHECK(pauli_identity_residual() > 1.0);
}
