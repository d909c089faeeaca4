package zoo;

public class Dog extends Animal {
  public String sound() {
    return "woof";
  }
}
