public class A {
  public int k() { return 10; }
}
