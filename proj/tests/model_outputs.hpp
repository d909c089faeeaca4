#pragma once

#include <string>

namespace reforacle::testing {

/// Test generated for the push-down-method pair (p01).
inline const std::string kPushDownTest =
    "import static org.junit.Assert.assertEquals;\n"
    "import org.junit.Test;\n"
    "\n"
    "public class RefactoringBehaviorTest {\n"
    "  @Test\n"
    "  public void testMBehavior() {\n"
    "    assertEquals(10, new C().m());\n"
    "  }\n"
    "}\n";

/// Behavior-change answer carrying the test above.
inline std::string behavior_change_output() {
  return R"({"verdict": "NO - BEHAVIOR CHANGE", )"
         R"("explanation": "m() moved from B to C, so super.k() now resolves to B.k(). )"
         R"(The call returns 20 instead of 10.", "junit_test": )" +
         std::string("\"") +
         "import static org.junit.Assert.assertEquals;\\n"
         "import org.junit.Test;\\n"
         "\\n"
         "public class RefactoringBehaviorTest {\\n"
         "  @Test\\n"
         "  public void testMBehavior() {\\n"
         "    assertEquals(10, new C().m());\\n"
         "  }\\n"
         "}\\n\"}";
}

/// Compilation-error answer for the inline-variable pair (p02).
inline const std::string kCompilationErrorOutput =
    R"({"verdict": "NO - COMPILATION ERROR", "explanation": "The conditional has primitive )"
    R"(type int. Calling byteValue() on an int does not compile.", "junit_test": null})";

/// Behavior-preserving answer for the same pair.
inline const std::string kYesOutput =
    R"({"verdict": "YES", "explanation": "The conditional is boxed to Integer. )"
    R"(Both versions call byteValue() on the same value.", "junit_test": null})";

}  // namespace reforacle::testing
