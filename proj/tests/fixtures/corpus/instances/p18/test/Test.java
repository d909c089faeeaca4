package bank;

import static org.junit.Assert.assertEquals;

import org.junit.Test;

public class RefactoringBehaviorTest {
  @Test
  public void behaviorIsPreserved() {
    assertEquals(10, new Loan().interest(200));
  }
}
