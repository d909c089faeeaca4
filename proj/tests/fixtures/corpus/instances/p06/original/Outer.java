public class Outer {
  private static int secret() {
    return 7;
  }

  static class Helper {
    int reveal() {
      return secret();
    }
  }

  public int use() {
    return new Helper().reveal();
  }
}
