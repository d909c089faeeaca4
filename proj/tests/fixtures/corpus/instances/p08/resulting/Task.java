public abstract class Task {
  protected String name = "base";

  public abstract String run();

  protected String getName() {
    return name;
  }

  public static Task create() {
    return new Task() {
      String name = "anon";

      @Override
      public String run() {
        return getName();
      }
    };
  }
}
