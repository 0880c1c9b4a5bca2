"""A small length-preserving model shared by several test files."""

# Flip the first bit or keep the word, one half each; "stop" is live on words ending in 1.
TOY = """
model toy {
  alphabet = [0, 1];
  weight = 10;
  bound = 2;
  length_preserving = true;
  rel Flip(x, y) = regex (<0,1>|<1,0>)(<0,0>|<1,1>)*;
  domain = !(x = "");
  action f = (x = y | Flip(x, y)) & z = 1 | !(x = y | Flip(x, y)) & z = 0;
  action stop = (x = y & last_1(x)) & z = 10 | !(x = y & last_1(x)) & z = 0;
}
"""
