// runner implementation follows
