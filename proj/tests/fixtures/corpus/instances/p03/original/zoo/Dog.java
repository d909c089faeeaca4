package zoo;

public class Dog extends Animal {
  public String bark() {
    return "woof";
  }
}
