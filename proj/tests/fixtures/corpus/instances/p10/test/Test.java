import static org.junit.Assert.assertEquals;

import org.junit.Test;

public class RefactoringBehaviorTest {
  @Test
  public void behaviorIsPreserved() {
    assertEquals("[HEY]hello", new Loud().shout());
  }
}
