import java.io.IOException;

public class Loader {
  public String load(boolean fail) {
    try {
      check(fail);
      return "ok";
    } catch (IOException e) {
      return "failed";
    }
  }

  private void check(boolean fail) {
    if (fail) {
      throw new IOException("boom");
    }
  }
}
